// Command-line front end for dominant-label disagreement potentials:
// submodularity verification, pair classification, truncated-linear
// decomposition, and exact energy minimization.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "labelcut/labelcut.hpp"

namespace {

using labelcut::json;

void emit(const json& report, const std::string& output_path) {
    std::string text = report.dump(2) + "\n";
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw labelcut::Error("cannot open output file \"" + output_path + "\"");
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw labelcut::Error("cannot open input file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_verify(const std::string& g_text, long long k, bool exhaustive, unsigned long long sampled_pairs,
               long long seed, bool allow_unvalidated, unsigned threads, unsigned long long max_violations,
               const std::string& output_path) {
    if (k < 1) {
        std::cerr << "verify: --k must be >= 1\n";
        return labelcut::kExitUsage;
    }
    if (exhaustive == (sampled_pairs > 0)) {
        std::cerr << "verify: choose exactly one of --exhaustive and --sampled <pairs>\n";
        return labelcut::kExitUsage;
    }
    auto [family, weight] = labelcut::parse_g_string(g_text);
    labelcut::ConcaveSpec spec =
        labelcut::make_spec_for_k(family, weight, static_cast<std::size_t>(k), allow_unvalidated);

    labelcut::VerifyReport report;
    json doc;
    doc["command"] = "verify";
    doc["g"] = labelcut::g_to_string(spec);
    doc["validated"] = spec.validated;
    doc["k"] = k;
    if (exhaustive) {
        doc["mode"] = "exhaustive";
        report = labelcut::verify_exhaustive(spec, static_cast<std::size_t>(k),
                                             {threads, max_violations});
    } else {
        doc["mode"] = "sampled";
        doc["pairs"] = sampled_pairs;
        doc["seed"] = seed;
        report = labelcut::verify_sampled(spec, static_cast<std::size_t>(k), sampled_pairs,
                                          static_cast<std::uint64_t>(seed), max_violations);
    }
    doc.update(labelcut::verify_report_to_json(report));
    emit(doc, output_path);
    return report.violations_total > 0 ? labelcut::kExitViolations : labelcut::kExitOk;
}

int run_classify(const std::string& a_text, const std::string& b_text, const std::string& g_text,
                 const std::string& output_path) {
    labelcut::LabelVector a = labelcut::LabelVector::from_string(a_text);
    labelcut::LabelVector b = labelcut::LabelVector::from_string(b_text);
    auto [join, meet] = labelcut::join_meet(a, b);
    auto [proof_case, kappa] = labelcut::classify_case(a, b);
    auto [family, weight] = labelcut::parse_g_string(g_text);
    labelcut::ConcaveSpec spec = labelcut::make_spec_for_k(family, weight, a.size());

    json doc;
    doc["command"] = "classify";
    doc["a"] = a.to_string();
    doc["b"] = b.to_string();
    doc["join"] = join.to_string();
    doc["meet"] = meet.to_string();
    doc["kappa"] = json::array({kappa.k1, kappa.k2, kappa.k3, kappa.k4});
    doc["case"] = labelcut::to_string(proof_case);
    json dominant;
    auto describe = [&dominant](const char* key, const labelcut::LabelVector& vec) {
        auto d = labelcut::dominant_label(vec);
        dominant[key] = {{"label", labelcut::to_string(d.majority)}, {"n0", d.n0}, {"n1", d.n1}};
    };
    describe("a", a);
    describe("b", b);
    describe("join", join);
    describe("meet", meet);
    doc["dominant"] = std::move(dominant);
    doc["g"] = labelcut::g_to_string(spec);
    doc["margin"] = labelcut::submodular_margin(spec, a, b);
    emit(doc, output_path);
    return labelcut::kExitOk;
}

int run_decompose(const std::string& g_text, long long k, const std::string& output_path) {
    if (k < 2) {
        std::cerr << "decompose: --k must be >= 2\n";
        return labelcut::kExitUsage;
    }
    auto [family, weight] = labelcut::parse_g_string(g_text);
    labelcut::ConcaveSpec spec = labelcut::make_spec_for_k(family, weight, static_cast<std::size_t>(k));
    std::size_t t_eff = static_cast<std::size_t>(k) / 2;
    labelcut::Decomposition dec = labelcut::decompose_truncated(spec, t_eff);

    double max_residual = 0.0;
    for (std::size_t t = 0; t <= t_eff; ++t)
        max_residual = std::max(max_residual, std::abs(dec.reconstruct(t) - spec.samples[t]));

    json doc;
    doc["command"] = "decompose";
    doc["g"] = labelcut::g_to_string(spec);
    doc["k"] = k;
    doc["t_eff"] = t_eff;
    doc["constant"] = dec.constant;
    json pieces = json::array();
    for (const labelcut::Piece& p : dec.pieces) pieces.push_back({{"cap", p.cap}, {"lambda", p.lambda}});
    doc["pieces"] = std::move(pieces);
    doc["max_residual"] = max_residual;
    emit(doc, output_path);
    return labelcut::kExitOk;
}

int run_minimize(const std::string& input_path, const std::string& method, const std::string& output_path) {
    labelcut::Instance inst = labelcut::parse_instance(read_file(input_path));

    json doc;
    doc["command"] = "minimize";
    doc["input"] = input_path;
    doc["method"] = method;
    int exit_code = labelcut::kExitOk;
    if (method == "brute") {
        doc.update(labelcut::solution_to_json(labelcut::minimize_bruteforce(inst)));
    } else if (method == "cut") {
        doc.update(labelcut::solution_to_json(labelcut::minimize_cut(inst)));
    } else if (method == "both") {
        labelcut::Solution brute = labelcut::minimize_bruteforce(inst);
        labelcut::Solution cut = labelcut::minimize_cut(inst);
        doc["brute"] = labelcut::solution_to_json(brute);
        doc["cut"] = labelcut::solution_to_json(cut);
        double diff = std::abs(brute.energy - cut.energy);
        doc["energy_difference"] = diff;
        doc["consistent"] = diff <= labelcut::kEnergyTol;
        if (diff > labelcut::kEnergyTol) exit_code = labelcut::kExitSelfCheckMismatch;
    } else {
        std::cerr << "minimize: --method must be brute, cut, or both\n";
        return labelcut::kExitUsage;
    }
    emit(doc, output_path);
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dominant-label disagreement potentials: verify submodularity, classify pairs,\n"
                 "decompose concave penalties, and minimize hypergraph energies exactly"};
    app.require_subcommand(1);
    app.fallthrough(); // let --output / --seed appear after the subcommand name

    std::string output_path;
    long long seed = 0;
    app.add_option("--output", output_path, "write the report to this path (default: stdout)");
    app.add_option("--seed", seed, "seed for sampled verification");

    auto* verify = app.add_subcommand("verify", "check the lattice inequality over pairs of label vectors");
    std::string verify_g;
    long long verify_k = 0;
    bool exhaustive = false;
    unsigned long long sampled_pairs = 0;
    bool allow_unvalidated = false;
    unsigned threads = 0;
    unsigned long long max_violations = 1u << 20;
    verify->add_option("--g", verify_g, "penalty spec, e.g. sqrt, power:0.5, trunclin:1,2, table:0,1,1.5")
        ->required();
    verify->add_option("--k", verify_k, "label vector length")->required();
    verify->add_flag("--exhaustive", exhaustive, "sweep all 4^k ordered pairs (k <= 13)");
    verify->add_option("--sampled", sampled_pairs, "check this many seeded random pairs instead");
    verify->add_flag("--allow-unvalidated", allow_unvalidated,
                     "keep non-concave tables instead of rejecting them");
    verify->add_option("--threads", threads, "worker threads for the exhaustive sweep (0 = auto)");
    verify->add_option("--max-violations", max_violations, "cap on stored violations");

    auto* classify = app.add_subcommand("classify", "kappa profile, join/meet, and proof case of a pair");
    std::string a_text, b_text, classify_g = "sqrt";
    classify->add_option("--a", a_text, "first bit string; leftmost character is node 0")->required();
    classify->add_option("--b", b_text, "second bit string")->required();
    classify->add_option("--g", classify_g, "penalty used for the reported margin");

    auto* decompose = app.add_subcommand("decompose", "truncated-linear pieces of a concave penalty");
    std::string decompose_g;
    long long decompose_k = 0;
    decompose->add_option("--g", decompose_g, "penalty spec")->required();
    decompose->add_option("--k", decompose_k, "hyperedge size; pieces cover deviations up to k/2")
        ->required();

    auto* minimize = app.add_subcommand("minimize", "minimize unary + hyperedge disagreement energy");
    std::string input_path, method = "cut";
    minimize->add_option("--input", input_path, "instance file (JSON)")->required();
    minimize->add_option("--method", method, "brute | cut | both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? labelcut::kExitOk : labelcut::kExitUsage;
    }

    try {
        if (verify->parsed())
            return run_verify(verify_g, verify_k, exhaustive, sampled_pairs, seed, allow_unvalidated,
                              threads, max_violations, output_path);
        if (classify->parsed()) return run_classify(a_text, b_text, classify_g, output_path);
        if (decompose->parsed()) return run_decompose(decompose_g, decompose_k, output_path);
        return run_minimize(input_path, method, output_path);
    } catch (const labelcut::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return labelcut::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return labelcut::kExitUsage;
    }
}

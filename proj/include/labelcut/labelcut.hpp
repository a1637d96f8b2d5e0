#ifndef LABELCUT_LABELCUT_HPP
#define LABELCUT_LABELCUT_HPP

// Umbrella header: dominant-label disagreement potentials, their
// submodularity verification, and exact minimization via minimum cut.

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"
#include "labelcut/io.hpp"
#include "labelcut/maxflow.hpp"
#include "labelcut/reduction.hpp"
#include "labelcut/solver.hpp"
#include "labelcut/verifier.hpp"

#endif

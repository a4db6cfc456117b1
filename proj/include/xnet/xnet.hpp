#pragma once

// Umbrella header: the full expression-network regression library.

#include "xnet/error.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/limits.hpp"
#include "xnet/tree.hpp"
#include "xnet/eval.hpp"
#include "xnet/formula.hpp"
#include "xnet/model_io.hpp"
#include "xnet/finite_diff.hpp"
#include "xnet/backprop.hpp"
#include "xnet/evolve.hpp"
#include "xnet/dataset.hpp"
#include "xnet/trainer.hpp"
#include "xnet/mlp.hpp"
#include "xnet/report.hpp"
#include "xnet/bench.hpp"
#include "xnet/config.hpp"

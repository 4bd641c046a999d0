#pragma once

#include "causal2d/core.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/testfn.hpp"
#include "causal2d/pairing.hpp"
#include "causal2d/decomp.hpp"
#include "causal2d/causal.hpp"
#include "causal2d/expr.hpp"
#include "causal2d/io.hpp"

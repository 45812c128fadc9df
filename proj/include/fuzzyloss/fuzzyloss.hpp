#ifndef FUZZYLOSS_FUZZYLOSS_HPP
#define FUZZYLOSS_FUZZYLOSS_HPP

#include "fuzzyloss/extended_real.hpp"
#include "fuzzyloss/generator.hpp"
#include "fuzzyloss/tnorm.hpp"
#include "fuzzyloss/formula.hpp"
#include "fuzzyloss/loss_expr.hpp"
#include "fuzzyloss/compiler.hpp"
#include "fuzzyloss/kb_file.hpp"
#include "fuzzyloss/rng.hpp"
#include "fuzzyloss/network.hpp"
#include "fuzzyloss/trainer.hpp"
#include "fuzzyloss/dataset.hpp"
#include "fuzzyloss/bench.hpp"

#endif  // FUZZYLOSS_FUZZYLOSS_HPP

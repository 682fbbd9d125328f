#ifndef SYMTEST_SYMTEST_HPP
#define SYMTEST_SYMTEST_HPP

#include "symtest/common.hpp"
#include "symtest/groups/actions.hpp"
#include "symtest/harness/experiment.hpp"
#include "symtest/kernels/bandwidth.hpp"
#include "symtest/kernels/kernels.hpp"
#include "symtest/kernels/mmd.hpp"
#include "symtest/physics/jets.hpp"
#include "symtest/power/bounds.hpp"
#include "symtest/randomization/dataset.hpp"
#include "symtest/randomization/pvalue.hpp"
#include "symtest/randomization/samplers.hpp"
#include "symtest/randomization/tests.hpp"
#include "symtest/rng.hpp"
#include "symtest/synth/designs.hpp"

#endif

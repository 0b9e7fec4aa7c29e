#pragma once

// Umbrella header: sparse Fourier recovery for signals whose support is
// polynomially or block structured, plus the experiment harness around it.

#include "sft/bench.hpp"
#include "sft/column_solver.hpp"
#include "sft/dft.hpp"
#include "sft/numtheory.hpp"
#include "sft/recover.hpp"
#include "sft/rng.hpp"
#include "sft/spectrum.hpp"

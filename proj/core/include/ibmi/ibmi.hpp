#pragma once

#include "ibmi/analysis.hpp"
#include "ibmi/bench.hpp"
#include "ibmi/errors.hpp"
#include "ibmi/factor.hpp"
#include "ibmi/gemm.hpp"
#include "ibmi/io.hpp"
#include "ibmi/kernels.hpp"
#include "ibmi/matrix.hpp"
#include "ibmi/norms.hpp"
#include "ibmi/partition.hpp"
#include "ibmi/solver.hpp"

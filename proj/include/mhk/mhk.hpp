#ifndef MHK_MHK_HPP
#define MHK_MHK_HPP

#include "mhk/core.hpp"
#include "mhk/matspace.hpp"
#include "mhk/kernels.hpp"
#include "mhk/qp.hpp"
#include "mhk/stm.hpp"
#include "mhk/data.hpp"
#include "mhk/bench.hpp"

#endif  // MHK_MHK_HPP

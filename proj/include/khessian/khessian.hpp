#pragma once

#include "khessian/errors.hpp"
#include "khessian/symfun.hpp"
#include "khessian/cone.hpp"
#include "khessian/seeds.hpp"
#include "khessian/minors.hpp"
#include "khessian/grid.hpp"
#include "khessian/rhs.hpp"
#include "khessian/pde.hpp"
#include "khessian/iterate.hpp"
#include "khessian/io.hpp"
#include "khessian/config.hpp"
#include "khessian/solve.hpp"
#include "khessian/verify.hpp"

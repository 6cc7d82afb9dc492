#pragma once

// Umbrella header.

#include "varcond/calculus.hpp"
#include "varcond/driver.hpp"
#include "varcond/errors.hpp"
#include "varcond/expr.hpp"
#include "varcond/jetspace.hpp"
#include "varcond/oracle.hpp"
#include "varcond/parser.hpp"
#include "varcond/problem_file.hpp"
#include "varcond/quadrature.hpp"
#include "varcond/report.hpp"
#include "varcond/second_order.hpp"
#include "varcond/simplify.hpp"
#include "varcond/variational.hpp"

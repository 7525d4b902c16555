#ifndef FLOWTREE_FLOWTREE_HPP
#define FLOWTREE_FLOWTREE_HPP

#include "bmo.hpp"
#include "czd.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "function.hpp"
#include "generators.hpp"
#include "io.hpp"
#include "maximal.hpp"
#include "measure.hpp"
#include "operators.hpp"
#include "rational.hpp"
#include "trapezoid.hpp"
#include "tree.hpp"

#endif

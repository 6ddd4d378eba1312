#pragma once

#include "settol/csp.hpp"
#include "settol/errors.hpp"
#include "settol/lp.hpp"
#include "settol/mst.hpp"
#include "settol/oracle.hpp"
#include "settol/rational.hpp"
#include "settol/subset.hpp"
#include "settol/tolerance.hpp"

#pragma once

#include "bigint.hpp"
#include "cf.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "extraction.hpp"
#include "fixtures.hpp"
#include "interval.hpp"
#include "poly.hpp"
#include "rational_function.hpp"
#include "recurrence.hpp"
#include "search.hpp"
#include "sicf.hpp"
#include "transform.hpp"

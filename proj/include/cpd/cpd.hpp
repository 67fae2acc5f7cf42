#pragma once

#include "cpd/baselines.hpp"
#include "cpd/data.hpp"
#include "cpd/interval.hpp"
#include "cpd/io.hpp"
#include "cpd/metrics.hpp"
#include "cpd/models/lasso.hpp"
#include "cpd/models/mean.hpp"
#include "cpd/models/nmcd.hpp"
#include "cpd/oracle.hpp"
#include "cpd/relief.hpp"
#include "cpd/rng.hpp"
#include "cpd/search/binseg.hpp"
#include "cpd/search/common.hpp"
#include "cpd/search/dp.hpp"
#include "cpd/simdata.hpp"

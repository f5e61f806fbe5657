#pragma once

#include "monostop/closed_forms.hpp"
#include "monostop/distributions.hpp"
#include "monostop/dp_oracle.hpp"
#include "monostop/errors.hpp"
#include "monostop/mc_engine.hpp"
#include "monostop/numerics.hpp"
#include "monostop/problems/burglar.hpp"
#include "monostop/problems/disorder.hpp"
#include "monostop/problems/house.hpp"
#include "monostop/problems/investment.hpp"
#include "monostop/problems_io.hpp"
#include "monostop/report_io.hpp"
#include "monostop/rng.hpp"
#include "monostop/stopping_core.hpp"
#include "monostop/stopping_sets.hpp"
#include "monostop/version.hpp"

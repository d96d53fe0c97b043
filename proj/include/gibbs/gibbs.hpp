#pragma once

#include "gibbs/analytic.hpp"
#include "gibbs/dichotomous.hpp"
#include "gibbs/eig.hpp"
#include "gibbs/error.hpp"
#include "gibbs/future.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/marginal_table.hpp"
#include "gibbs/model.hpp"
#include "gibbs/model_io.hpp"
#include "gibbs/oracle.hpp"
#include "gibbs/randomized.hpp"
#include "gibbs/scaled.hpp"
#include "gibbs/spatial.hpp"
#include "gibbs/step_sequence.hpp"
#include "gibbs/table.hpp"
#include "gibbs/transfer.hpp"

#pragma once

#include "biaskit/csv.hpp"
#include "biaskit/dataset.hpp"
#include "biaskit/idx.hpp"
#include "biaskit/imbalance.hpp"
#include "biaskit/metrics.hpp"
#include "biaskit/mixture.hpp"
#include "biaskit/rng.hpp"
#include "biaskit/roc.hpp"
#include "biaskit/schema.hpp"
#include "biaskit/shift.hpp"
#include "biaskit/smote.hpp"
#include "biaskit/tree.hpp"

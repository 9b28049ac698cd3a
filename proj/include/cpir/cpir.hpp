#pragma once

#include "cpir/error.hpp"
#include "cpir/numeric.hpp"
#include "cpir/domain.hpp"
#include "cpir/relation.hpp"
#include "cpir/table.hpp"
#include "cpir/log_combination.hpp"
#include "cpir/entropy.hpp"
#include "cpir/constraint.hpp"
#include "cpir/dag.hpp"
#include "cpir/pir.hpp"
#include "cpir/maxent.hpp"
#include "cpir/causal_maxent.hpp"
#include "cpir/counting.hpp"
#include "cpir/igci.hpp"
#include "cpir/serialize.hpp"
#include "cpir/cli.hpp"

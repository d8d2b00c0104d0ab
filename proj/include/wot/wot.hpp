#pragma once

#include "wot/errors.hpp"
#include "wot/tolerance.hpp"
#include "wot/measure.hpp"
#include "wot/pwl.hpp"
#include "wot/order.hpp"
#include "wot/lp.hpp"
#include "wot/coupling.hpp"
#include "wot/decomposition.hpp"
#include "wot/shadow.hpp"
#include "wot/constructions.hpp"
#include "wot/projection.hpp"
#include "wot/oracle.hpp"

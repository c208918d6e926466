#pragma once

#include "qflag/arith.hpp"
#include "qflag/cohomology.hpp"
#include "qflag/cones.hpp"
#include "qflag/error.hpp"
#include "qflag/io.hpp"
#include "qflag/period.hpp"
#include "qflag/quiver.hpp"
#include "qflag/schur.hpp"
#include "qflag/search.hpp"
#include "qflag/store.hpp"

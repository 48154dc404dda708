#pragma once

#include "svcnch/cv.hpp"
#include "svcnch/dataset.hpp"
#include "svcnch/errors.hpp"
#include "svcnch/kernel.hpp"
#include "svcnch/maxmin.hpp"
#include "svcnch/model.hpp"
#include "svcnch/pga.hpp"
#include "svcnch/smo.hpp"
#include "svcnch/solver.hpp"

#pragma once

#include "jpow/error.hpp"
#include "jpow/field.hpp"
#include "jpow/poly.hpp"
#include "jpow/matrix.hpp"
#include "jpow/jordan.hpp"
#include "jpow/random.hpp"
#include "jpow/potent.hpp"
#include "jpow/generate.hpp"
#include "jpow/report.hpp"
#include "jpow/preserver.hpp"
#include "jpow/suite.hpp"
#include "jpow/io.hpp"

#pragma once

#include "pcgl/amalgam.hpp"
#include "pcgl/config.hpp"
#include "pcgl/core.hpp"
#include "pcgl/exhaustion.hpp"
#include "pcgl/field.hpp"
#include "pcgl/functionals.hpp"
#include "pcgl/grid.hpp"
#include "pcgl/integrator.hpp"
#include "pcgl/io.hpp"
#include "pcgl/monitors.hpp"
#include "pcgl/params.hpp"

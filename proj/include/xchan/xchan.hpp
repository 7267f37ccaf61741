#pragma once

#include "xchan/channel.hpp"
#include "xchan/density.hpp"
#include "xchan/dilation.hpp"
#include "xchan/error.hpp"
#include "xchan/extremal.hpp"
#include "xchan/matrix_core.hpp"
#include "xchan/qubit_geometry.hpp"

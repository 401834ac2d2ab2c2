#pragma once

#include "eitnoise/common.hpp"
#include "eitnoise/variables.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/model.hpp"
#include "eitnoise/linearization.hpp"
#include "eitnoise/spectra.hpp"
#include "eitnoise/analysis.hpp"

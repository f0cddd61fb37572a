#pragma once

#include "qtel/channels.hpp"
#include "qtel/experiment.hpp"
#include "qtel/linalg.hpp"
#include "qtel/operator_space.hpp"
#include "qtel/qubit_bases.hpp"
#include "qtel/resource.hpp"
#include "qtel/teleport.hpp"
#include "qtel/types.hpp"

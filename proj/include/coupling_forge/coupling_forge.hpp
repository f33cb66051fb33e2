#pragma once

#include "coupling_forge/bigint.hpp"
#include "coupling_forge/cache.hpp"
#include "coupling_forge/coupling.hpp"
#include "coupling_forge/maxflow.hpp"
#include "coupling_forge/pivot.hpp"
#include "coupling_forge/processes.hpp"
#include "coupling_forge/row_classes.hpp"
#include "coupling_forge/serialize.hpp"
#include "coupling_forge/special_functions.hpp"
#include "coupling_forge/structures.hpp"

#pragma once

// Umbrella header for the numeric core. File I/O (JSON documents, CSV
// export) lives in scrollforge/io.hpp and is not pulled in here.

#include "scrollforge/analysis.hpp"
#include "scrollforge/integrate.hpp"
#include "scrollforge/pwl.hpp"
#include "scrollforge/systems.hpp"
#include "scrollforge/vec_mat.hpp"

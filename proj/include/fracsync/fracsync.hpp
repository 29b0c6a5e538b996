#pragma once

#include "fracsync/config.hpp"
#include "fracsync/drift.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/grid.hpp"
#include "fracsync/io.hpp"
#include "fracsync/path.hpp"
#include "fracsync/rde.hpp"
#include "fracsync/regularity.hpp"
#include "fracsync/rng.hpp"
#include "fracsync/runner.hpp"
#include "fracsync/stats.hpp"
#include "fracsync/sync.hpp"
#include "fracsync/transform.hpp"
#include "fracsync/types.hpp"
#include "fracsync/young.hpp"

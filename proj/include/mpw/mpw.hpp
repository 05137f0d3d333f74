#pragma once

#include "mpw/core.hpp"
#include "mpw/hj/branch.hpp"
#include "mpw/hj/characteristic.hpp"
#include "mpw/hj/hamiltonian.hpp"
#include "mpw/hj/operators.hpp"
#include "mpw/hj/transport.hpp"
#include "mpw/io/csv.hpp"
#include "mpw/oracle/cn.hpp"
#include "mpw/scenarios/box.hpp"
#include "mpw/scenarios/config.hpp"
#include "mpw/scenarios/coulomb.hpp"
#include "mpw/scenarios/double_slit.hpp"
#include "mpw/scenarios/harmonic.hpp"
#include "mpw/scenarios/hermite.hpp"
#include "mpw/scenarios/spin.hpp"
#include "mpw/scenarios/tunneling.hpp"
#include "mpw/wave/assemble.hpp"
#include "mpw/wave/field.hpp"
#include "mpw/wave/grid.hpp"
#include "mpw/wave/measure.hpp"
#include "mpw/wave/residual.hpp"

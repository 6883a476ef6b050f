#pragma once

// Umbrella header.

#include "hyperrigid/exact.hpp"
#include "hyperrigid/interval_topology.hpp"
#include "hyperrigid/linalg.hpp"
#include "hyperrigid/cstar_base.hpp"
#include "hyperrigid/correspondence.hpp"
#include "hyperrigid/topograph.hpp"
#include "hyperrigid/fock_witness.hpp"
#include "hyperrigid/io.hpp"

#pragma once

#include "radiobcast/adversary.hpp"
#include "radiobcast/broadcast.hpp"
#include "radiobcast/bruteforce.hpp"
#include "radiobcast/family_io.hpp"
#include "radiobcast/graph.hpp"
#include "radiobcast/multi.hpp"
#include "radiobcast/provision.hpp"
#include "radiobcast/radiosim.hpp"
#include "radiobcast/selective.hpp"
#include "radiobcast/sequences.hpp"
#include "radiobcast/setfam.hpp"
#include "radiobcast/strongly_selective.hpp"

#pragma once

#include "spinbath/constants.hpp"
#include "spinbath/material.hpp"
#include "spinbath/sectors.hpp"
#include "spinbath/box_channel.hpp"
#include "spinbath/dephasing.hpp"
#include "spinbath/entanglement.hpp"
#include "spinbath/experiments.hpp"
#include "spinbath/table.hpp"
#include "spinbath/config.hpp"
#include "spinbath/commands.hpp"

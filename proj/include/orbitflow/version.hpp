#pragma once

#define ORBITFLOW_VERSION "0.1.0"

#include "logpi1/rational.hpp"

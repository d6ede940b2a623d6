#pragma once

// Named parameters from the standard small examples and a self-checking suite
// built on them.

#include <string>
#include <vector>

#include "fundim/network.hpp"

namespace fundim::worked {

// Flat parameters given as rational strings or integers.
RationalParameter make(const std::vector<size_t>& widths, const std::vector<std::string>& flat);

RationalParameter s0();           // (1,2,1): (2,-5,-1,4,1,1,1)
RationalParameter fiber_low();    // (1,2,1): (1,1,-1,-2,1,-1,0), realizes max(0, x+1)
RationalParameter fiber_high();   // (1,2,1): (1,0,-1,0,1,-1,1), realizes max(0, x+1)
RationalParameter abs_branch1();  // (1,2,1): (1,0,-1,0,1,1,0), realizes |x|
RationalParameter abs_branch2();  // (1,2,1): (-1,0,1,0,1,1,0), realizes |x|
RationalParameter two_neuron();   // (1,2): (1,0,1,-1)
RationalParameter chain_111();    // (1,1,1): (1,0,1,-1)

struct Check {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass = false;
};

std::vector<Check> demo_suite();

}  // namespace fundim::worked

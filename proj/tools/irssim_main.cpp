// SPDX-License-Identifier: Apache-2.0
#include "irssim/config.hpp"

#include <iostream>

int main() {
    std::cout << irssim::config_to_string(irssim::SystemConfig{});
    return 0;
}

// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "so4atom/cli.hpp"

int main(int argc, char** argv) { return so4atom::run_main(argc, argv, std::cout, std::cerr); }

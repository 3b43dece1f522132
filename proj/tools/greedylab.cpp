// Copyright 2026 The greedylab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "greedylab/cli.hpp"

int main(int argc, char** argv) { return greedylab::cli::run(argc, argv, std::cout, std::cerr); }

// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/cli.hpp"

int main(int argc, char** argv) { return brwlab::cli_main(argc, argv); }

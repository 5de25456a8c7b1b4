// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pwfriend::cli::run(std::env::args_os()))
}

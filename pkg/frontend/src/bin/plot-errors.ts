#!/usr/bin/env node
import { plotErrorsProgram, runProgram } from "../cli.js";

process.exit(runProgram(plotErrorsProgram(), process.argv));

#!/usr/bin/env node
import { plotPathsProgram, runProgram } from "../cli.js";

process.exit(runProgram(plotPathsProgram(), process.argv));

#!/usr/bin/env node
import { plotStayProbProgram, runProgram } from "../cli.js";

process.exit(runProgram(plotStayProbProgram(), process.argv));

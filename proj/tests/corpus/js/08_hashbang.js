#!/usr/bin/env node
"use strict";
function main(argv) {
  return argv.length;
}
main(process.argv);

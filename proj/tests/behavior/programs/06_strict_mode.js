"use strict";
function who() { return this === undefined ? "undefined" : typeof this; }
function assignUndeclared() {
  try { undeclaredVariable = 1; return "no error"; } catch (e) { return e.constructor.name; }
}
function local() { "use strict"; return (function () { return this; })() === undefined; }
out.push(who(), assignUndeclared(), local());

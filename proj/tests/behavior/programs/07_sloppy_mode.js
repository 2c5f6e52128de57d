function who() { return this === globalThis; }
function withArgs(a) { arguments[0] = 99; return a; }
function hoisting() { return typeof inner + ":" + inner(); function inner() { return "hoisted"; } }
out.push(who(), withArgs(1), hoisting());

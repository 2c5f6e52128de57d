function greet(name = "world", { punct = "!" } = {}) { return "hello " + name + punct; }
function swap([a, b]) { return [b, a]; }
function pick({ x, y: [first, ...others] }) { return x + first + others.length; }
out.push(greet(), greet("you", { punct: "?" }), swap([1, 2]).join(","), pick({ x: 1, y: [2, 3, 4] }));

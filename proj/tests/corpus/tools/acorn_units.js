// Reference labeller: prints every function-like unit that acorn finds, with
// UTF-8 byte offsets, in the same line format as `jscov analyze --format lines`.
//   node acorn_units.js [--json] file...
const fs = require("fs");
const acorn = require(process.env.ACORN_PATH || "acorn");

function byteOffsets(text) {
  // map UTF-16 index -> UTF-8 byte offset
  const map = new Array(text.length + 1);
  let b = 0;
  for (let i = 0; i < text.length; i++) {
    map[i] = b;
    const c = text.charCodeAt(i);
    if (c < 0x80) b += 1;
    else if (c < 0x800) b += 2;
    else if (c >= 0xd800 && c <= 0xdbff) { map[i + 1] = b; b += 4; i++; }
    else b += 3;
  }
  map[text.length] = b;
  return map;
}

function keyName(prop) {
  if (prop.computed) return null;
  const k = prop.key;
  if (k.type === "Identifier") return k.name;
  if (k.type === "PrivateIdentifier") return "#" + k.name;
  if (k.type === "Literal") return typeof k.value === "string" ? k.raw.slice(1, -1) : k.raw;
  return null;
}

// acorn drops the parentheses of `() => (expr)` from the body node; jscov
// treats the whole concise body, parentheses included, as the body span.
function conciseBody(text, fn) {
  let start = fn.body.start, end = fn.body.end;
  if (fn.body.type === "BlockStatement") return [start, end];
  const ws = /\s/;
  for (;;) {
    let s = start - 1, e = end;
    while (s >= 0 && ws.test(text[s])) s--;
    while (e < fn.end && ws.test(text[e])) e++;
    if (text[s] === "(" && text[e] === ")" && e < fn.end) { start = s; end = e + 1; } else break;
  }
  return [start, end];
}

function collect(ast, map, text) {
  const units = [];
  const add = (kind, node, fn, name) => units.push({
    kind, start: map[node.start], end: map[node.end],
    body_start: map[conciseBody(text, fn)[0]], body_end: map[conciseBody(text, fn)[1]],
    name: name == null ? null : name, async: !!fn.async, generator: !!fn.generator,
  });
  (function walk(node, parent) {
    if (!node || typeof node.type !== "string") return;
    switch (node.type) {
      case "FunctionDeclaration": add("declaration", node, node, node.id && node.id.name); break;
      case "FunctionExpression":
        if (!(parent && (parent.type === "MethodDefinition" ||
              (parent.type === "Property" && (parent.method || parent.kind !== "init")))))
          add("expression", node, node, node.id && node.id.name);
        break;
      case "ArrowFunctionExpression": add("arrow", node, node, null); break;
      case "Property":
        if (node.method || node.kind === "get" || node.kind === "set")
          add(node.kind === "get" ? "getter" : node.kind === "set" ? "setter" : "method", node, node.value, keyName(node));
        break;
      case "MethodDefinition":
        add(node.kind === "constructor" ? "constructor" : node.kind === "get" ? "getter" :
            node.kind === "set" ? "setter" : "method", node, node.value, keyName(node));
        break;
    }
    for (const key of Object.keys(node)) {
      if (key === "loc") continue;
      const v = node[key];
      if (Array.isArray(v)) v.forEach((c) => walk(c, node));
      else if (v && typeof v.type === "string") walk(v, node);
    }
  })(ast, null);
  units.sort((a, b) => a.start - b.start);
  return units;
}

const json = process.argv.includes("--json");
for (const file of process.argv.slice(2).filter((a) => a !== "--json")) {
  const text = fs.readFileSync(file, "utf8");
  let ast = null, err = null;
  for (const sourceType of ["script", "module"]) {
    try { ast = acorn.parse(text, { ecmaVersion: "latest", sourceType, allowHashBang: true }); break; }
    catch (e) { err = e; }
  }
  if (!ast) { console.log(`FILE ${file} ERR ${err.message}`); continue; }
  const units = collect(ast, byteOffsets(text), text);
  if (json) { console.log(JSON.stringify(units, null, 1)); continue; }
  console.log(`FILE ${file} OK ${units.length}`);
  for (const u of units) console.log(`${u.kind} ${u.start} ${u.end} ${u.body_start} ${u.body_end} ${u.name == null ? "-" : u.name}`);
}

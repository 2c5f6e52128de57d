const r1 = /function\s*\(\)/g;
const r2 = /[/}]/;
const r3 = /\/{2}/.test('//');
const div = 10 / 2 / 5;
const r4 = [/=>/, /{/];
function f(x) { return x / 2; }
const r5 = f(4) /2/ 1;
const r6 = typeof /x/;
const r7 = (0, /a/u).source;
const r8 = /[\]\}]/v;
if (true) /regex-after-paren/.test('');
const obj = { a: 1 } / 2;
let g = 1; g
/2/1;
const r9 = `${/}/.source}`;

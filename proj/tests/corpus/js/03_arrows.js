const id = x => x;
const pair = (a, b) => [a, b];
const obj = () => ({ a: 1, b: 2 });
const nestedParen = () => ((1 + 2));
const block = (x) => { return x + 1; };
const curry = a => b => c => a + b + c;
const asyncArrow = async () => await Promise.resolve(1);
const asyncParam = async x => x;
const defaults = (a = () => 1, { b } = {}, ...rest) => a() + b + rest.length;
[1, 2].forEach(n => { console.log(n); });
const seq = (a, b) => (a, b);

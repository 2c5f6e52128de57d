const a = async (x, y) => x + y;
const b = async function () {};
const c = (async) => async;
const d = async => async;
const e = ([first, ...rest]) => first;
const f = ({ a, b: [c] }) => a + c;
const g = () => () => () => () => 'deep';
const h = x => ({}).toString.call(x);
const i = (x) => x ? y => y : z => z;
const j = () => { };
const k = () => function () { return () => 1; };
const l = (a, b = a => a) => b(a);

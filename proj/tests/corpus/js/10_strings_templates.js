const s1 = 'function () { }';
const s2 = "=> { }";
const s3 = 'escaped \' quote } {';
const s4 = "line \
continuation";
const t1 = `template ${(() => 'inner')()} with function() {} text`;
const t2 = `nested ${`deeper ${[1].map(x => `x=${x}`).join()}`}`;
const t3 = String.raw`raw \u{ not escape ${function () { return 1; }()}`;
function tagged(strings, ...vals) { return strings.raw.join('|') + vals.length; }
tagged`a${1}b${2}c`;
const t4 = `braces { } inside ${ { a: 1 }.a } template`;

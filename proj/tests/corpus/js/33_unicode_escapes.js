const \u0066n2 = 0;
const fn = function () { return 'escaped identifier'; };
const o = { \u0061bc() { return 1; }, 'ü'() { return 2; } };
const s = "  line separator inside string";
const t = 'tab\there';
function ñandú() { return "🦤 🦤"; }

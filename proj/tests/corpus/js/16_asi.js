let a = 1
let b = a
(function () { return 0 })
const c = () => 1
const d = function () {}
[1, 2].forEach(x => x)
var e = 2
++e
function last() { return }
last()
const f = async
function notAsyncArrow() {}

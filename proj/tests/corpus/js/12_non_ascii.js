// Ünïcödé comments: 日本語 and emoji 🎉
const grüße = 'Grüße, 世界';
function 変数(値) {
  return 値 + '✓';
}
const café = () => 'naïve 🎂';
const obj = {
  ключ() { return 'значение'; },
  get π() { return 3.14159; },
};
class Ωmega {
  método() { return '🚀'; }
}
const identa = function () { return '\u{1F600}'; };
変数(grüße);

document.addEventListener('DOMContentLoaded', function () {
  const buttons = document.querySelectorAll('button');
  buttons.forEach(function (btn) {
    btn.addEventListener('click', (ev) => {
      ev.preventDefault();
      fetch('/api').then(r => r.json()).then(function (data) {
        console.log(data);
      }).catch(err => console.error(err));
    });
  });
});

'use strict';
function boot() {
  const root = document.getElementById('root');
  render(root, { title: 'Fixture' });
  return root;
}

function render(node, props) {
  const items = ['a', 'b', 'c'].map((x) => `<li>${x}</li>`).join('');
  if (node) node.innerHTML = `<h1>${props.title}</h1><ul>${items}</ul>`;
  return items;
}

function openSettingsDialog(options) {
  const dialog = document.createElement('dialog');
  dialog.className = 'settings';
  const fields = Object.keys(options || {}).map(function (key) {
    const value = options[key];
    const label = document.createElement('label');
    label.textContent = key;
    const input = document.createElement('input');
    input.name = key;
    input.value = String(value);
    input.addEventListener('change', function () {
      options[key] = input.value;
      console.log('settings changed', key, input.value);
    });
    label.appendChild(input);
    return label;
  });
  fields.forEach((f) => dialog.appendChild(f));
  document.body.appendChild(dialog);
  dialog.showModal();
  return dialog;
}

function exportReport(rows) {
  const header = ['id', 'name', 'score', 'updated'].join(',');
  const lines = rows.map((r) => [r.id, JSON.stringify(r.name), r.score.toFixed(2), new Date(r.updated).toISOString()].join(','));
  const blob = new Blob([header + '\n' + lines.join('\n')], { type: 'text/csv' });
  const url = URL.createObjectURL(blob);
  const a = document.createElement('a');
  a.href = url;
  a.download = 'report-' + Date.now() + '.csv';
  document.body.appendChild(a);
  a.click();
  setTimeout(() => { URL.revokeObjectURL(url); a.remove(); }, 1000);
  return lines.length;
}

boot();

import os
import sys

from app import create_app
from app.cli import run

app = create_app()

if __name__ == '__main__':
    # `python app.py serve` starts the API; any other arguments go to the command line
    if sys.argv[1:2] == ['serve']:
        app.run(debug=app.config.get('DEBUG', False), host='0.0.0.0', port=int(os.environ.get('PORT', 5000)))
    else:
        sys.exit(run(sys.argv[1:]))

from regionclust.main import run

run()
